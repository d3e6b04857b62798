fn main() {
    std::process::exit(dsap::cli::main_with_args(std::env::args_os()));
}
