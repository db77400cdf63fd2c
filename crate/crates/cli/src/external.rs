use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Sat,
    Unsat,
    /// Anything that is not a bare `sat` or `unsat` line.
    Other(String),
}

/// The first nonblank line of solver output decides the answer.
pub fn interpret(stdout: &str) -> Answer {
    match stdout.lines().map(str::trim).find(|l| !l.is_empty()) {
        Some("sat") => Answer::Sat,
        Some("unsat") => Answer::Unsat,
        Some(line) => Answer::Other(format!("solver answered '{line}'")),
        None => Answer::Other("solver printed nothing".into()),
    }
}

/// Runs `command` (split on whitespace) with `script` appended, killing it
/// after `timeout`. Exit status is ignored.
pub fn run(command: &str, script: &Path, timeout: Duration) -> Result<(Answer, Duration), String> {
    let mut words = command.split_whitespace();
    let exe = words.next().ok_or("empty solver command")?;
    let started = Instant::now();
    let mut child = Command::new(exe)
        .args(words)
        .arg(script)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("cannot run '{exe}': {e}"))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut text = String::new();
        let _ = stdout.read_to_string(&mut text);
        text
    });
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if started.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("solver timed out after {timeout:?}"));
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(e.to_string()),
        }
    }
    let elapsed = started.elapsed();
    let text = reader.join().map_err(|_| "solver output reader panicked")?;
    Ok((interpret(&text), elapsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answers() {
        assert_eq!(interpret("sat\n"), Answer::Sat);
        assert_eq!(interpret("\n  unsat  \n(model)"), Answer::Unsat);
        assert!(matches!(interpret("unknown\n"), Answer::Other(_)));
        assert!(matches!(interpret(""), Answer::Other(_)));
        assert!(matches!(interpret("(error \"x\")\nsat"), Answer::Other(_)));
    }

    #[test]
    fn missing_executable() {
        let r = run(
            "/nonexistent/solver",
            Path::new("x.smt2"),
            Duration::from_secs(1),
        );
        assert!(r.unwrap_err().contains("cannot run"));
    }

    #[cfg(unix)]
    #[test]
    fn shell_script_as_solver() {
        // `sh <script>` runs the script, standing in for a solver binary
        let dir = std::env::temp_dir().join(format!("qborrow-ext-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        for (body, expected) in [
            ("echo unsat", Answer::Unsat),
            ("echo; echo sat", Answer::Sat),
        ] {
            let script = dir.join("answer.sh");
            std::fs::write(&script, body).unwrap();
            let (a, _) = run("sh", &script, Duration::from_secs(5)).unwrap();
            assert_eq!(a, expected);
        }
        let (a, _) = run("echo", Path::new("x.smt2"), Duration::from_secs(5)).unwrap();
        assert!(matches!(a, Answer::Other(_)));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[cfg(unix)]
    #[test]
    fn timeout_kills_the_solver() {
        let r = run("sleep", Path::new("5"), Duration::from_millis(50));
        assert!(r.unwrap_err().contains("timed out"));
    }
}
