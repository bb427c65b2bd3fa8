fn main() {
    std::process::exit(spiralsheet::cli::main_entry());
}
