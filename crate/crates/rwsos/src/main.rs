fn main() {
    std::process::exit(rwsos::cli::run());
}
