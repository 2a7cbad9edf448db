fn main() {
    std::process::exit(heunband_cli::main_with_args(std::env::args_os()));
}
