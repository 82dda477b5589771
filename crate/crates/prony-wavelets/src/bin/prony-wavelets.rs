fn main() {
    std::process::exit(prony_wavelets::cli::cli_dispatch(std::env::args()));
}
