fn main() {
    std::process::exit(chipfire::cli::run());
}
