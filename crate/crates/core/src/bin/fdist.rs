fn main() {
    std::process::exit(fdist::cli::main_with_args(std::env::args_os()));
}
