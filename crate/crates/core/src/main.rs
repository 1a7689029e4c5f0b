fn main() {
    std::process::exit(dact::cli::main_with_args(std::env::args_os()));
}
