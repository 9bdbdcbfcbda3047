fn main() {
    std::process::exit(qdunkl::cli::run());
}
