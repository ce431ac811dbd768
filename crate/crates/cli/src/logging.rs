//! One JSON object per log line on stderr.

use log::{Level, Log, Metadata, Record};
use serde_json::json;

struct JsonLines {
    level: Level,
}

impl Log for JsonLines {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= self.level
    }

    fn log(&self, record: &Record) {
        if self.enabled(record.metadata()) {
            let line = json!({
                "level": record.level().as_str(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            eprintln!("{line}");
        }
    }

    fn flush(&self) {}
}

pub fn init(quiet: bool) {
    let level = if quiet { Level::Warn } else { Level::Info };
    if log::set_boxed_logger(Box::new(JsonLines { level })).is_ok() {
        log::set_max_level(level.to_level_filter());
    }
}
