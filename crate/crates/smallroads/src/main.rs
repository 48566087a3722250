fn main() {
    std::process::exit(smallroads::cli::run());
}
