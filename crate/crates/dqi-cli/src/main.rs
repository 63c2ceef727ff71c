fn main() {
    std::process::exit(dqi_cli::run());
}
