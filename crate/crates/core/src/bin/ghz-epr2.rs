fn main() {
    std::process::exit(ghz_epr2::cli::main());
}
