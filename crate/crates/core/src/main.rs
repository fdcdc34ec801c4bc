fn main() {
    std::process::exit(splatprior::cli::run());
}
