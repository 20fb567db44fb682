fn main() {
    std::process::exit(windowgap_cli::main_with_args(std::env::args_os()));
}
