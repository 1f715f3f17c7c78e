fn main() {
    std::process::exit(cfbounds::cli::run());
}
