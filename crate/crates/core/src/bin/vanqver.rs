fn main() {
    std::process::exit(vanqver::cli::main_with_args(std::env::args_os()));
}
