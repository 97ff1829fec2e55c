fn main() {
    std::process::exit(anyon_cli::main_with_args(std::env::args_os()));
}
