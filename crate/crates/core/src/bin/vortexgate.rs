fn main() {
    std::process::exit(vortexgate::cli::main_with_args(std::env::args_os()));
}
