fn main() {
    std::process::exit(gp_excited::cli::main_with_args(std::env::args_os()));
}
