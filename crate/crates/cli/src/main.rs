fn main() {
    std::process::exit(sidonlab_cli::run_from_args(std::env::args_os()));
}
