fn main() {
    std::process::exit(ordbasis::cli::run());
}
