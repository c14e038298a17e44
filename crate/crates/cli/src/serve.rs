use std::io::{BufRead, ErrorKind, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use brainsteer::session::{ServerBody, Session};
use brainsteer::RunConfig;
use clap::Args;
use tungstenite::{Message, WebSocket};

use crate::overrides::ConfigArgs;

/// Shortest socket read timeout; zero would mean "block forever".
const MIN_WAIT: Duration = Duration::from_millis(1);

#[derive(Args)]
pub struct ServeArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Listen port; 0 picks a free one. The bound address is printed on stdout.
    #[arg(long, env = "BRAINSTEER_PORT", default_value_t = 8765)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Speak the protocol as JSON lines on stdin/stdout instead of a socket.
    #[arg(long)]
    stdio: bool,
    /// Directory that receives each session's command schedule when a run ends.
    #[arg(long, value_name = "DIR")]
    record: Option<PathBuf>,
}

enum Incoming {
    Text(String),
    Timeout,
    Closed,
}

trait Transport {
    fn recv(&mut self, wait: Option<Duration>) -> Result<Incoming>;
    fn send(&mut self, text: String) -> Result<()>;
}

pub fn serve(args: ServeArgs) -> Result<()> {
    let cfg = args.cfg.resolve()?;
    if args.stdio {
        return run_session(
            Session::new(0, cfg)?,
            Stdio::spawn(),
            args.record.as_deref(),
        );
    }
    let listener = TcpListener::bind((args.host.as_str(), args.port))
        .with_context(|| format!("binding {}:{}", args.host, args.port))?;
    println!("listening on ws://{}", listener.local_addr()?);
    std::io::stdout().flush()?;
    let (cfg, record) = (Arc::new(cfg), args.record.map(Arc::new));
    let ids = AtomicU64::new(1);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let id = ids.fetch_add(1, Ordering::Relaxed);
        let (cfg, record) = (Arc::clone(&cfg), record.clone());
        std::thread::spawn(move || {
            if let Err(e) = connection(id, stream, &cfg, record.as_deref().map(|p| p.as_path())) {
                eprintln!("session {id}: {e:#}");
            }
        });
    }
    Ok(())
}

fn connection(id: u64, stream: TcpStream, cfg: &RunConfig, record: Option<&Path>) -> Result<()> {
    stream.set_nodelay(true)?;
    let ws = tungstenite::accept(stream).map_err(|e| anyhow::anyhow!("handshake: {e}"))?;
    run_session(Session::new(id, cfg.clone())?, Ws(ws), record)
}

/// The per-session event loop: messages and real-time steps are handled
/// one at a time, in arrival order.
fn run_session(mut session: Session, mut io: impl Transport, record: Option<&Path>) -> Result<()> {
    loop {
        let wait = session.next_due(Instant::now());
        let out = match io.recv(wait)? {
            Incoming::Text(text) => session.handle_text(&text, Instant::now()),
            Incoming::Timeout => session.poll(Instant::now()),
            Incoming::Closed => break,
        };
        let finished = out
            .iter()
            .any(|m| matches!(m.body, ServerBody::Metrics { .. }));
        for m in out {
            io.send(m.to_json())?;
        }
        if finished {
            save_schedule(&session, record)?;
        }
    }
    save_schedule(&session, record)
}

fn save_schedule(session: &Session, record: Option<&Path>) -> Result<()> {
    let Some(dir) = record else { return Ok(()) };
    if session.schedule().commands.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("session-{}.schedule.csv", session.id()));
    session.schedule().save(&path)?;
    Ok(())
}

struct Ws(WebSocket<TcpStream>);

impl Transport for Ws {
    fn recv(&mut self, wait: Option<Duration>) -> Result<Incoming> {
        self.0
            .get_mut()
            .set_read_timeout(wait.map(|w| w.max(MIN_WAIT)))?;
        loop {
            return match self.0.read() {
                Ok(Message::Text(t)) => Ok(Incoming::Text(t)),
                // answered as malformed rather than silently dropped
                Ok(Message::Binary(b)) => {
                    Ok(Incoming::Text(String::from_utf8_lossy(&b).into_owned()))
                }
                Ok(Message::Close(_)) => Ok(Incoming::Closed),
                Ok(_) => continue,
                Err(tungstenite::Error::Io(e))
                    if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) =>
                {
                    Ok(Incoming::Timeout)
                }
                Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => {
                    Ok(Incoming::Closed)
                }
                Err(tungstenite::Error::Protocol(_)) => Ok(Incoming::Closed),
                Err(e) => Err(e.into()),
            };
        }
    }

    fn send(&mut self, text: String) -> Result<()> {
        self.0.send(Message::Text(text))?;
        Ok(())
    }
}

/// JSON lines on stdin/stdout. Stdin is read on its own thread so real-time
/// pacing can wait on a channel with a timeout.
struct Stdio {
    lines: mpsc::Receiver<std::io::Result<String>>,
    out: std::io::Stdout,
}

impl Stdio {
    fn spawn() -> Self {
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in std::io::stdin().lock().lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Stdio {
            lines: rx,
            out: std::io::stdout(),
        }
    }
}

impl Transport for Stdio {
    fn recv(&mut self, wait: Option<Duration>) -> Result<Incoming> {
        loop {
            let line = match wait {
                Some(w) => match self.lines.recv_timeout(w) {
                    Ok(l) => l,
                    Err(RecvTimeoutError::Timeout) => return Ok(Incoming::Timeout),
                    Err(RecvTimeoutError::Disconnected) => return Ok(Incoming::Closed),
                },
                None => match self.lines.recv() {
                    Ok(l) => l,
                    Err(_) => return Ok(Incoming::Closed),
                },
            };
            let line = line.context("reading stdin")?;
            if !line.trim().is_empty() {
                return Ok(Incoming::Text(line));
            }
        }
    }

    fn send(&mut self, text: String) -> Result<()> {
        let mut out = self.out.lock();
        writeln!(out, "{text}")?;
        out.flush()?;
        Ok(())
    }
}
