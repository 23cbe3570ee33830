fn main() {
    std::process::exit(logunimodal_cli::main_with_args(std::env::args_os()));
}
