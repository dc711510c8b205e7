fn main() {
    std::process::exit(freelab::cli::main_with_args(std::env::args_os()));
}
