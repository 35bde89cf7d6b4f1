fn main() -> std::process::ExitCode {
    qecmetro_cli::main_entry()
}
