fn main() {
    std::process::exit(fracburgers_cli::main_with_args(std::env::args_os()));
}
