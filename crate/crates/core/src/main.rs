fn main() {
    std::process::exit(fracdiff::cli::main_with_args(std::env::args_os()));
}
