fn main() {
    std::process::exit(levy_jacobi::cli::main_with_args(std::env::args_os()));
}
