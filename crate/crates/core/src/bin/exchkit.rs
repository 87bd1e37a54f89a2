fn main() {
    std::process::exit(exchkit::cli::main_with_args(std::env::args_os()));
}
