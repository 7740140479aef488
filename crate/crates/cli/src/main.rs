fn main() {
    std::process::exit(gatepower_cli::main_with_args(std::env::args_os()));
}
