use std::process::ExitCode;

fn main() -> ExitCode {
    let out = mare_cli::execute(std::env::args_os().skip(1));
    if out.report_json.is_empty() {
        if let Some(msg) = &out.message {
            print!("{msg}");
        }
    } else {
        print!("{}", out.report_json);
        if let Some(msg) = &out.message {
            eprintln!("{}", msg.trim_end());
        }
    }
    ExitCode::from(out.exit_code as u8)
}
