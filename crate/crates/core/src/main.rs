fn main() {
    std::process::exit(kflat_core::cli::main_with_args(std::env::args_os()));
}
