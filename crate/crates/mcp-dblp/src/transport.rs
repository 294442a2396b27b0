//! MCP server transport: newline-delimited JSON-RPC 2.0 over arbitrary
//! reader/writer pairs (stdio in production, byte buffers in tests).
//!
//! The loop is deliberately single-threaded and sequential: one request is
//! read, handled to completion (handlers may block on the network) and
//! answered before the next line is parsed. Protocol errors become JSON-RPC
//! error responses and tool failures become `isError` results; nothing a
//! client sends can terminate the loop short of closing stdin. Diagnostics
//! go to the `log` facade (stderr in the binary), never to stdout, which
//! must stay pure protocol.

use std::io::{BufRead, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Map, Value};

pub const SERVER_NAME: &str = "mcp-dblp";
pub const SERVER_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Offered when the client asks for a protocol revision we do not know.
pub const DEFAULT_PROTOCOL_VERSION: &str = "2024-11-05";
pub const SUPPORTED_PROTOCOL_VERSIONS: [&str; 3] =
    ["2024-11-05", "2025-03-26", "2025-06-18"];

const PARSE_ERROR: i64 = -32700;
const INVALID_REQUEST: i64 = -32600;
const METHOD_NOT_FOUND: i64 = -32601;
const INVALID_PARAMS: i64 = -32602;

/// Advertised tool: name, human description and JSON Schema for arguments.
#[derive(Debug, Clone)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub input_schema: Value,
}

impl ToolDescriptor {
    pub fn new(name: &str, description: &str, input_schema: Value) -> Self {
        ToolDescriptor {
            name: name.to_owned(),
            description: description.to_owned(),
            input_schema,
        }
    }
}

/// Outcome of a tool invocation. Failures are results, not protocol errors:
/// the client's model is expected to read the message and adjust.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolResult {
    pub text: String,
    pub is_error: bool,
}

impl ToolResult {
    pub fn ok(text: impl Into<String>) -> Self {
        ToolResult {
            text: text.into(),
            is_error: false,
        }
    }

    pub fn error(text: impl Into<String>) -> Self {
        ToolResult {
            text: text.into(),
            is_error: true,
        }
    }

    fn to_value(&self) -> Value {
        json!({
            "content": [{"type": "text", "text": self.text}],
            "isError": self.is_error,
        })
    }
}

/// The tool registry the transport serves. Implementations must not assume
/// arguments were sanitized beyond their declared schema.
pub trait ToolHandler {
    fn descriptors(&self) -> Vec<ToolDescriptor>;
    fn invoke(&self, name: &str, arguments: &Map<String, Value>) -> ToolResult;
}

/// Reusable prompt served via `prompts/list` / `prompts/get`.
#[derive(Debug, Clone)]
pub struct Prompt {
    pub name: String,
    pub description: String,
    pub text: String,
}

pub struct Server<H> {
    handler: H,
    descriptors: Vec<ToolDescriptor>,
    prompts: Vec<Prompt>,
}

impl<H: ToolHandler> Server<H> {
    pub fn new(handler: H) -> Self {
        let descriptors = handler.descriptors();
        Server {
            handler,
            descriptors,
            prompts: Vec::new(),
        }
    }

    pub fn with_prompts(mut self, prompts: Vec<Prompt>) -> Self {
        self.prompts = prompts;
        self
    }

    pub fn descriptors(&self) -> &[ToolDescriptor] {
        &self.descriptors
    }

    /// Serves until `input` reaches EOF. One JSON message per line, in and
    /// out; notifications produce no output line.
    pub fn run(&self, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(response) = self.handle_line(&line) {
                // serde_json never emits raw newlines, so one write is one frame.
                serde_json::to_writer(&mut output, &response)?;
                output.write_all(b"\n")?;
                output.flush()?;
            }
        }
        log::info!("stdin closed, shutting down");
        Ok(())
    }

    /// Handles one frame. `None` means no response is owed (notification).
    pub fn handle_line(&self, line: &str) -> Option<Value> {
        let message: Value = match serde_json::from_str(line) {
            Ok(value) => value,
            Err(err) => {
                log::warn!("unparseable frame: {err}");
                return Some(error_response(
                    Value::Null,
                    PARSE_ERROR,
                    format!("parse error: {err}"),
                ));
            }
        };
        let Some(object) = message.as_object() else {
            return Some(error_response(
                Value::Null,
                INVALID_REQUEST,
                "invalid request: expected an object".to_owned(),
            ));
        };
        let id = object.get("id").cloned();
        let method = object.get("method").and_then(Value::as_str);
        let params = object
            .get("params")
            .and_then(Value::as_object)
            .cloned()
            .unwrap_or_default();

        let Some(method) = method else {
            // Responses from the client (result/error frames) are legal to
            // ignore; a request without a method is not.
            return id.map(|id| {
                error_response(
                    id,
                    INVALID_REQUEST,
                    "invalid request: missing method".to_owned(),
                )
            });
        };

        let Some(id) = id else {
            self.handle_notification(method);
            return None;
        };

        log::debug!("request {method}");
        let outcome = match method {
            "initialize" => Ok(self.initialize_result(&params)),
            "ping" => Ok(json!({})),
            "tools/list" => Ok(self.tools_list()),
            "tools/call" => self.tools_call(&params),
            "prompts/list" => Ok(self.prompts_list()),
            "prompts/get" => self.prompts_get(&params),
            other => Err((METHOD_NOT_FOUND, format!("method not found: {other}"))),
        };
        Some(match outcome {
            Ok(result) => json!({"jsonrpc": "2.0", "id": id, "result": result}),
            Err((code, message)) => error_response(id, code, message),
        })
    }

    fn handle_notification(&self, method: &str) {
        match method {
            // Sent by clients after initialize; nothing to do.
            "initialized" | "notifications/initialized" => {}
            other => log::debug!("ignoring notification {other}"),
        }
    }

    fn initialize_result(&self, params: &Map<String, Value>) -> Value {
        let requested = params
            .get("protocolVersion")
            .and_then(Value::as_str)
            .unwrap_or(DEFAULT_PROTOCOL_VERSION);
        let negotiated = if SUPPORTED_PROTOCOL_VERSIONS.contains(&requested) {
            requested
        } else {
            DEFAULT_PROTOCOL_VERSION
        };
        json!({
            "protocolVersion": negotiated,
            "capabilities": {"tools": {}, "prompts": {}},
            "serverInfo": {"name": SERVER_NAME, "version": SERVER_VERSION},
        })
    }

    fn tools_list(&self) -> Value {
        let tools: Vec<Value> = self
            .descriptors
            .iter()
            .map(|d| {
                json!({
                    "name": d.name,
                    "description": d.description,
                    "inputSchema": d.input_schema,
                })
            })
            .collect();
        json!({ "tools": tools })
    }

    fn tools_call(&self, params: &Map<String, Value>) -> Result<Value, (i64, String)> {
        let Some(name) = params.get("name").and_then(Value::as_str) else {
            return Err((INVALID_PARAMS, "missing tool name".to_owned()));
        };
        if !self.descriptors.iter().any(|d| d.name == name) {
            return Err((INVALID_PARAMS, format!("unknown tool: {name}")));
        }
        let arguments = params
            .get("arguments")
            .and_then(Value::as_object)
            .cloned()
            .unwrap_or_default();
        Ok(self.dispatch_tool(name, &arguments).to_value())
    }

    /// Validates arguments against the tool's schema, then invokes the
    /// handler. A panicking handler is converted into an error result so the
    /// serving loop survives. Callers must pass a registered tool name.
    pub fn dispatch_tool(&self, name: &str, arguments: &Map<String, Value>) -> ToolResult {
        let descriptor = self
            .descriptors
            .iter()
            .find(|d| d.name == name)
            .expect("dispatch_tool requires a registered tool name");
        if let Err(message) = validate_arguments(&descriptor.input_schema, arguments) {
            return ToolResult::error(message);
        }
        match catch_unwind(AssertUnwindSafe(|| self.handler.invoke(name, arguments))) {
            Ok(result) => result,
            Err(_) => {
                log::error!("tool {name} panicked");
                ToolResult::error(format!("internal error: tool '{name}' panicked"))
            }
        }
    }

    fn prompts_list(&self) -> Value {
        let prompts: Vec<Value> = self
            .prompts
            .iter()
            .map(|p| json!({"name": p.name, "description": p.description}))
            .collect();
        json!({ "prompts": prompts })
    }

    fn prompts_get(&self, params: &Map<String, Value>) -> Result<Value, (i64, String)> {
        let Some(name) = params.get("name").and_then(Value::as_str) else {
            return Err((INVALID_PARAMS, "missing prompt name".to_owned()));
        };
        let Some(prompt) = self.prompts.iter().find(|p| p.name == name) else {
            return Err((INVALID_PARAMS, format!("unknown prompt: {name}")));
        };
        Ok(json!({
            "description": prompt.description,
            "messages": [{
                "role": "user",
                "content": {"type": "text", "text": prompt.text},
            }],
        }))
    }
}

fn error_response(id: Value, code: i64, message: String) -> Value {
    json!({"jsonrpc": "2.0", "id": id, "error": {"code": code, "message": message}})
}

/// Minimal JSON Schema check: `required` names must be present and non-null,
/// present properties must match their declared `type` (array items one
/// level deep). Undeclared arguments pass through untouched; messages name
/// the offending parameter.
pub fn validate_arguments(schema: &Value, arguments: &Map<String, Value>) -> Result<(), String> {
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        for name in required.iter().filter_map(Value::as_str) {
            match arguments.get(name) {
                None | Some(Value::Null) => {
                    return Err(format!("missing required parameter '{name}'"));
                }
                Some(_) => {}
            }
        }
    }
    let Some(properties) = schema.get("properties").and_then(Value::as_object) else {
        return Ok(());
    };
    for (name, value) in arguments {
        let Some(property) = properties.get(name) else {
            continue;
        };
        if value.is_null() {
            // Null for an optional parameter reads as "absent".
            continue;
        }
        let Some(expected) = property.get("type").and_then(Value::as_str) else {
            continue;
        };
        if !type_matches(expected, value) {
            return Err(format!(
                "type mismatch on parameter '{name}': expected {expected}, got {}",
                json_type_name(value)
            ));
        }
        if expected == "array" {
            if let (Some(item_type), Some(items)) = (
                property
                    .get("items")
                    .and_then(|i| i.get("type"))
                    .and_then(Value::as_str),
                value.as_array(),
            ) {
                for (index, item) in items.iter().enumerate() {
                    if !type_matches(item_type, item) {
                        return Err(format!(
                            "type mismatch on parameter '{name}[{index}]': expected {item_type}, got {}",
                            json_type_name(item)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn type_matches(expected: &str, value: &Value) -> bool {
    match expected {
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "object" => value.is_object(),
        "array" => value.is_array(),
        "number" => value.is_number(),
        // Clients routinely send 5.0 for 5; accept any zero-fraction number.
        "integer" => {
            value.is_i64()
                || value.is_u64()
                || value.as_f64().is_some_and(|f| f.fract() == 0.0 && f.is_finite())
        }
        _ => true,
    }
}

fn json_type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
