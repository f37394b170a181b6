use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use crate::protocol::{InMsg, OutMsg};
use crate::session::Session;

/// Protocol state for one client stream.
#[derive(Debug, Default)]
pub struct Connection {
    session: Option<Session>,
    started: Option<Instant>,
}

impl Connection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    /// Handles one input line and returns the replies in order.
    pub fn handle_line(&mut self, line: &str) -> Vec<OutMsg> {
        if line.trim().is_empty() {
            return Vec::new();
        }
        let msg = match InMsg::parse(line) {
            Ok(m) => m,
            Err(e) => return vec![OutMsg::Error(e)],
        };
        match msg {
            InMsg::Config(cfg) => match Session::new(cfg) {
                Ok(s) => {
                    let layout = s.layout(0.0);
                    self.session = Some(s);
                    self.started = Some(Instant::now());
                    vec![layout]
                }
                Err(e) => vec![OutMsg::Error(e)],
            },
            InMsg::Input(sample) => match self.session.as_mut() {
                Some(s) => s.ingest(sample),
                None => vec![OutMsg::error("no-session", "send a config message first")],
            },
            InMsg::Reset => match self.session.as_mut() {
                Some(s) => {
                    s.reset();
                    Vec::new()
                }
                None => vec![OutMsg::error("no-session", "send a config message first")],
            },
        }
    }

    /// Layout at the current session time, if a session is running.
    pub fn layout_now(&self) -> Option<OutMsg> {
        let s = self.session.as_ref()?;
        let t = self.started?.elapsed().as_secs_f64();
        Some(s.layout(t))
    }

    fn tick(&self) -> Option<Duration> {
        let rate = self.session.as_ref()?.config().sample_rate_hz;
        Some(Duration::from_secs_f64(1.0 / rate))
    }
}

fn write_msgs<W: Write>(out: &Mutex<W>, msgs: &[OutMsg]) -> io::Result<()> {
    if msgs.is_empty() {
        return Ok(());
    }
    let mut w = out.lock().unwrap_or_else(|e| e.into_inner());
    for m in msgs {
        writeln!(w, "{}", m.to_line())?;
    }
    w.flush()
}

/// Runs the protocol over a byte stream until the reader closes. With
/// `ticker`, layout messages are also sent at the session sample rate.
pub fn serve_stream<R: BufRead, W: Write + Send>(
    reader: R,
    writer: W,
    ticker: bool,
) -> io::Result<()> {
    let conn = Mutex::new(Connection::new());
    let out = Mutex::new(writer);
    let done = AtomicBool::new(false);

    thread::scope(|scope| {
        if ticker {
            scope.spawn(|| {
                while !done.load(Ordering::Relaxed) {
                    let (msg, wait) = {
                        let c = conn.lock().unwrap_or_else(|e| e.into_inner());
                        (c.layout_now(), c.tick())
                    };
                    if let Some(m) = msg {
                        if write_msgs(&out, &[m]).is_err() {
                            break;
                        }
                    }
                    thread::sleep(wait.unwrap_or(Duration::from_millis(50)));
                }
            });
        }
        let result = (|| {
            for line in reader.lines() {
                let line = line?;
                let replies = conn
                    .lock()
                    .unwrap_or_else(|e| e.into_inner())
                    .handle_line(&line);
                write_msgs(&out, &replies)?;
            }
            Ok(())
        })();
        done.store(true, Ordering::Relaxed);
        result
    })
}

fn handle_client(stream: TcpStream) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    serve_stream(reader, stream, true)
}

/// Accepts clients forever, one thread per connection.
pub fn serve_tcp(listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        thread::spawn(move || {
            let _ = handle_client(stream);
        });
    }
    Ok(())
}

/// Protocol over stdin/stdout, without the layout ticker so replies depend
/// only on the input lines.
pub fn serve_stdio() -> io::Result<()> {
    let stdin = io::stdin();
    serve_stream(stdin.lock(), io::stdout(), false)
}
