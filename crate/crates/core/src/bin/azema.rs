fn main() {
    std::process::exit(azema::cli::main_with_args(std::env::args_os()));
}
