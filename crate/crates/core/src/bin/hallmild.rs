fn main() {
    std::process::exit(hallmild::cli::main_with_args(std::env::args_os()));
}
