//! C ABI for the comdb engine.
//!
//! The engine is held behind an opaque handle; every call reports a
//! [`ComdbStatus`] and stores a message retrievable with
//! [`comdb_last_error`]. Strings returned through out-parameters are
//! allocated by this library and must be released with
//! [`comdb_string_free`]. A handle is not thread-safe; confine it to one
//! thread or guard it externally.

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use comdb::shell::{Format, Shell};

/// Opaque engine handle: one in-memory model plus its derived
/// properties and the current constraint set.
pub struct ComdbEngine {
    shell: Shell,
    last_error: CString,
}

/// Result codes of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComdbStatus {
    ComdbOk = 0,
    /// A file could not be read, written or parsed.
    ComdbErrIo = 1,
    /// The query or command failed to parse, check or evaluate.
    ComdbErrQuery = 2,
    /// A null pointer or malformed UTF-8 argument.
    ComdbErrInvalidArgument = 3,
}

impl ComdbEngine {
    fn set_error(&mut self, message: &str) {
        self.last_error = CString::new(message.replace('\0', " ")).unwrap_or_default();
    }
}

fn engine_mut<'a>(engine: *mut ComdbEngine) -> Option<&'a mut ComdbEngine> {
    unsafe { engine.as_mut() }
}

fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, ()> {
    if ptr.is_null() {
        return Err(());
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| ())
}

fn opt_cstr_arg<'a>(ptr: *const c_char) -> Result<Option<&'a str>, ()> {
    if ptr.is_null() {
        Ok(None)
    } else {
        cstr_arg(ptr).map(Some)
    }
}

fn out_string(out: *mut *mut c_char, text: String) -> bool {
    if out.is_null() {
        return false;
    }
    let c = CString::new(text.replace('\0', " ")).unwrap_or_default();
    unsafe { *out = c.into_raw() };
    true
}

/// Create an engine with an empty model.
#[no_mangle]
pub extern "C" fn comdb_engine_new() -> *mut ComdbEngine {
    Box::into_raw(Box::new(ComdbEngine {
        shell: Shell::new(),
        last_error: CString::default(),
    }))
}

/// Destroy an engine created by [`comdb_engine_new`]. Null is ignored.
#[no_mangle]
pub extern "C" fn comdb_engine_free(engine: *mut ComdbEngine) {
    if !engine.is_null() {
        drop(unsafe { Box::from_raw(engine) });
    }
}

/// Release a string returned through an out-parameter. Null is ignored.
#[no_mangle]
pub extern "C" fn comdb_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// The message of the most recent failure on this engine. The pointer
/// stays valid until the next call on the same engine.
#[no_mangle]
pub extern "C" fn comdb_last_error(engine: *const ComdbEngine) -> *const c_char {
    match unsafe { engine.as_ref() } {
        Some(e) => e.last_error.as_ptr(),
        None => ptr::null(),
    }
}

/// Load a schema file and, when `data_path` is non-null, a data file.
/// Replaces the engine's current model.
#[no_mangle]
pub extern "C" fn comdb_load(
    engine: *mut ComdbEngine,
    schema_path: *const c_char,
    data_path: *const c_char,
) -> ComdbStatus {
    let Some(e) = engine_mut(engine) else {
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let (Ok(schema_path), Ok(data_path)) = (cstr_arg(schema_path), opt_cstr_arg(data_path)) else {
        e.set_error("null or non-UTF-8 path argument");
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    match comdb::io::load(Path::new(schema_path), data_path.map(Path::new)) {
        Ok(schema) => {
            e.shell = Shell::with_schema(schema);
            ComdbStatus::ComdbOk
        }
        Err(err) => {
            e.set_error(&err.to_string());
            ComdbStatus::ComdbErrIo
        }
    }
}

/// Save the model as canonical schema and data files.
#[no_mangle]
pub extern "C" fn comdb_save(
    engine: *mut ComdbEngine,
    schema_path: *const c_char,
    data_path: *const c_char,
) -> ComdbStatus {
    let Some(e) = engine_mut(engine) else {
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let (Ok(schema_path), Ok(data_path)) = (cstr_arg(schema_path), cstr_arg(data_path)) else {
        e.set_error("null or non-UTF-8 path argument");
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    match comdb::io::save(&e.shell.schema, Path::new(schema_path), Path::new(data_path)) {
        Ok(()) => ComdbStatus::ComdbOk,
        Err(err) => {
            e.set_error(&err.to_string());
            ComdbStatus::ComdbErrIo
        }
    }
}

/// Ingest the CSV files described by a TOML mapping file; paths inside
/// the map resolve relative to the map's directory.
#[no_mangle]
pub extern "C" fn comdb_import_csv(
    engine: *mut ComdbEngine,
    map_path: *const c_char,
    report_out: *mut *mut c_char,
) -> ComdbStatus {
    let Some(e) = engine_mut(engine) else {
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let Ok(map_path) = cstr_arg(map_path) else {
        e.set_error("null or non-UTF-8 path argument");
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let map_path = PathBuf::from(map_path);
    let text = match std::fs::read_to_string(&map_path) {
        Ok(t) => t,
        Err(err) => {
            e.set_error(&format!("cannot read `{}`: {err}", map_path.display()));
            return ComdbStatus::ComdbErrIo;
        }
    };
    let map = match comdb::io::IngestMap::parse_toml(&text) {
        Ok(m) => m,
        Err(err) => {
            e.set_error(&err.to_string());
            return ComdbStatus::ComdbErrIo;
        }
    };
    let base = map_path.parent().unwrap_or(Path::new("")).to_path_buf();
    match comdb::io::ingest_csv(&mut e.shell.schema, &map, &base) {
        Ok(report) => {
            if !report_out.is_null() {
                out_string(report_out, report.to_string());
            }
            ComdbStatus::ComdbOk
        }
        Err(err) => {
            e.set_error(&err.to_string());
            ComdbStatus::ComdbErrIo
        }
    }
}

fn run_query(
    engine: *mut ComdbEngine,
    query: *const c_char,
    result_out: *mut *mut c_char,
    format: Format,
) -> ComdbStatus {
    let Some(e) = engine_mut(engine) else {
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let Ok(query) = cstr_arg(query) else {
        e.set_error("null or non-UTF-8 query");
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let previous = e.shell.format;
    e.shell.format = format;
    let mut buffer = Vec::new();
    let outcome = e.shell.run_query_text(query, &mut buffer);
    e.shell.format = previous;
    match outcome {
        Ok(()) => {
            if !out_string(result_out, String::from_utf8_lossy(&buffer).into_owned()) {
                e.set_error("null result out-parameter");
                return ComdbStatus::ComdbErrInvalidArgument;
            }
            ComdbStatus::ComdbOk
        }
        Err(message) => {
            e.set_error(&message);
            ComdbStatus::ComdbErrQuery
        }
    }
}

/// Evaluate a COQL query; the result arrives as JSON lines, one object
/// per row keyed by column name.
#[no_mangle]
pub extern "C" fn comdb_query_json(
    engine: *mut ComdbEngine,
    query: *const c_char,
    result_out: *mut *mut c_char,
) -> ComdbStatus {
    run_query(engine, query, result_out, Format::Json)
}

/// Evaluate a COQL query; the result arrives as tab-separated text with
/// a header row.
#[no_mangle]
pub extern "C" fn comdb_query_tsv(
    engine: *mut ComdbEngine,
    query: *const c_char,
    result_out: *mut *mut c_char,
) -> ComdbStatus {
    run_query(engine, query, result_out, Format::Tsv)
}

/// Run one shell command (`load`, `stats`, `flatten --tsv`, `constrain`,
/// `propagate --down`, `infer`, ...); captured output is returned.
#[no_mangle]
pub extern "C" fn comdb_execute(
    engine: *mut ComdbEngine,
    command: *const c_char,
    output_out: *mut *mut c_char,
) -> ComdbStatus {
    let Some(e) = engine_mut(engine) else {
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let Ok(command) = cstr_arg(command) else {
        e.set_error("null or non-UTF-8 command");
        return ComdbStatus::ComdbErrInvalidArgument;
    };
    let mut buffer = Vec::new();
    match e.shell.execute(command, &mut buffer) {
        Ok(_) => {
            if !output_out.is_null() {
                out_string(output_out, String::from_utf8_lossy(&buffer).into_owned());
            }
            ComdbStatus::ComdbOk
        }
        Err(message) => {
            e.set_error(&message);
            ComdbStatus::ComdbErrQuery
        }
    }
}
