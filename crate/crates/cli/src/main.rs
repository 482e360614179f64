fn main() {
    std::process::exit(gf2e_cli::main_with_args(std::env::args_os()));
}
