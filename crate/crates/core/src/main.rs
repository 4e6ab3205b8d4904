fn main() {
    std::process::exit(linkpack::cli::run());
}
