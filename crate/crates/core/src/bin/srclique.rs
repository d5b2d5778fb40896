fn main() {
    std::process::exit(semirandom_clique::cli::run(std::env::args_os()));
}
