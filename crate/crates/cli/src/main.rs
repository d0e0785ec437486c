fn main() {
    std::process::exit(qblaschke_cli::main_with_args(std::env::args_os()));
}
