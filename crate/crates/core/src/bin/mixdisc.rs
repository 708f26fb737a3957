fn main() {
    std::process::exit(mixdisc::cli::main_entry());
}
