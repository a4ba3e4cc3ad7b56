fn main() {
    std::process::exit(casimir_inertia_cli::run(std::env::args_os()));
}
