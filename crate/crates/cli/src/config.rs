//! Scenario configuration: a flat `key = value` file merged with
//! `--key value` overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Interferometer,
    Superdense,
    Teleport,
    Bb84,
    B92,
    Byzantine,
    Fingerprint,
    Ewl,
    Contract,
    Grover,
    Shor,
    Netsim,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 12] = [
        ScenarioKind::Interferometer,
        ScenarioKind::Superdense,
        ScenarioKind::Teleport,
        ScenarioKind::Bb84,
        ScenarioKind::B92,
        ScenarioKind::Byzantine,
        ScenarioKind::Fingerprint,
        ScenarioKind::Ewl,
        ScenarioKind::Contract,
        ScenarioKind::Grover,
        ScenarioKind::Shor,
        ScenarioKind::Netsim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Interferometer => "interferometer",
            ScenarioKind::Superdense => "superdense",
            ScenarioKind::Teleport => "teleport",
            ScenarioKind::Bb84 => "bb84",
            ScenarioKind::B92 => "b92",
            ScenarioKind::Byzantine => "byzantine",
            ScenarioKind::Fingerprint => "fingerprint",
            ScenarioKind::Ewl => "ewl",
            ScenarioKind::Contract => "contract",
            ScenarioKind::Grover => "grover",
            ScenarioKind::Shor => "shor",
            ScenarioKind::Netsim => "netsim",
        }
    }

    /// Scenario-specific keys with their defaults. An empty default means
    /// the key is optional and unset unless given.
    pub fn keys(self) -> &'static [KeySpec] {
        const QKD: &[KeySpec] = &[
            KeySpec::new("n", "10000", "pulses per session"),
            KeySpec::new("lambda", "0", "intercept-resend probability"),
            KeySpec::new("flip", "0", "channel bit-flip probability"),
            KeySpec::new("sample", "0.1", "fraction of the sifted key revealed for QBER estimation"),
            KeySpec::new("e_max", "0.11", "abort threshold on the corrected error rate"),
            KeySpec::new("s", "30", "security margin in bits"),
            KeySpec::new("transcript", "", "write trial 0's pulse transcript (CSV) to this path"),
            KeySpec::new("mode", "symbolic", "receiver model: symbolic | state_vector"),
        ];
        match self {
            ScenarioKind::Interferometer => const { &[
                KeySpec::new("splitters", "2", "1 or 2 beam splitters"),
                KeySpec::new("obstacle", "false", "absorbing screen on one path (2 splitters only)"),
            ] },
            ScenarioKind::Superdense => const { &[KeySpec::new(
                "message",
                "",
                "two-bit message 0..3; random per trial when unset",
            )] },
            ScenarioKind::Teleport => const { &[KeySpec::new(
                "hops",
                "1",
                "links in the swap chain distributing the shared pair",
            )] },
            ScenarioKind::Bb84 => QKD,
            ScenarioKind::B92 => &QKD[..7],
            ScenarioKind::Byzantine => const { &[
                KeySpec::new("m", "30", "shared qutrit triplets"),
                KeySpec::new("adversary", "all_honest", "all_honest | s_cheats | r0_cheats"),
                KeySpec::new("deal", "classical", "triplet source: classical | state_vector"),
            ] },
            ScenarioKind::Fingerprint => const { &[
                KeySpec::new("n", "3", "input length in bits (Hadamard code, m = 2^n)"),
                KeySpec::new("x", "3", "first input as an integer"),
                KeySpec::new("y", "5", "second input as an integer"),
                KeySpec::new("r", "1", "SWAP-test repetitions"),
            ] },
            ScenarioKind::Ewl => const { &[
                KeySpec::new("gamma", "1.5707963267948966", "entanglement in [0, π/2]"),
                KeySpec::new("alice", "Q", "C | D | Q | theta,phi"),
                KeySpec::new("bob", "Q", "C | D | Q | theta,phi"),
                KeySpec::new("resolution", "32", "deviation grid size for the Nash check"),
            ] },
            ScenarioKind::Contract => const { &[
                KeySpec::new("t", "4", "decoy pairs per side"),
                KeySpec::new(
                    "adversary",
                    "bob_measures_early",
                    "none | bob_measures_early | alice_measures_early | both_measure_early",
                ),
                KeySpec::new("data", "1", "data qubits per side"),
            ] },
            ScenarioKind::Grover => const { &[
                KeySpec::new("n", "10", "qubits"),
                KeySpec::new("k", "1", "marked items, drawn per trial"),
                KeySpec::new("iterations", "", "Grover iterations; optimal for k when unset"),
            ] },
            ScenarioKind::Shor => const { &[
                KeySpec::new("m", "15", "odd composite to factor"),
                KeySpec::new("attempts", "20", "random bases tried before giving up"),
            ] },
            ScenarioKind::Netsim => const { &[
                KeySpec::new("levels", "2", "router levels"),
                KeySpec::new("fanout", "2", "children per router, one value or a comma list per level"),
                KeySpec::new("hosts", "2", "hosts per level-0 router"),
                KeySpec::new("pairs", "4", "Bell pairs provisioned per edge"),
                KeySpec::new("mode", "teleport", "teleport | virtual | relay"),
                KeySpec::new("key_len", "128", "key bits for relay mode"),
            ] },
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown scenario \"{s}\"")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeySpec {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

impl KeySpec {
    const fn new(name: &'static str, default: &'static str, help: &'static str) -> Self {
        Self { name, default, help }
    }
}

/// Keys every scenario accepts.
pub const COMMON_KEYS: &[KeySpec] = &[
    KeySpec::new("scenario", "", "scenario name"),
    KeySpec::new("trials", "1", "independent trials"),
    KeySpec::new("seed", "", "master seed; drawn from entropy when unset"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Scenario keys with defaults filled in.
    pub params: BTreeMap<String, String>,
    pub trials: usize,
    pub seed: Option<u64>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses a `key = value` file; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value", i + 1)))?;
        let key = normalize(k);
        if key.is_empty() {
            return Err(CliError::Usage(format!("line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("line {}: duplicate key \"{key}\"", i + 1)));
        }
    }
    Ok(out)
}

impl ScenarioConfig {
    /// Validates a merged key-value map.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let scenario: ScenarioKind = map
            .get("scenario")
            .ok_or_else(|| CliError::Usage("missing key \"scenario\"".into()))?
            .parse()?;
        let trials: usize = parse_field("trials", map.get("trials").map_or("1", String::as_str))?;
        if trials == 0 {
            return Err(CliError::Usage("key \"trials\" must be at least 1".into()));
        }
        let seed = map.get("seed").map(|s| parse_field::<u64>("seed", s)).transpose()?;
        let keys = scenario.keys();
        let mut params = BTreeMap::new();
        for (k, v) in map {
            if COMMON_KEYS.iter().any(|c| c.name == k) {
                continue;
            }
            if !keys.iter().any(|s| s.name == k) {
                return Err(CliError::Usage(format!("unknown key \"{k}\" for scenario {scenario}")));
            }
            params.insert(k.clone(), v.clone());
        }
        for spec in keys {
            if !spec.default.is_empty() {
                params.entry(spec.name.to_string()).or_insert_with(|| spec.default.to_string());
            }
        }
        Ok(Self { scenario, params, trials, seed })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("missing key \"{key}\"")))?;
        parse_field(key, v)
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        self.params.get(key).map(|v| parse_field(key, v)).transpose()
    }

    pub fn text(&self, key: &str) -> &str {
        self.params.get(key).map_or("", String::as_str)
    }
}

pub fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("invalid value \"{value}\" for key \"{key}\": {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub config: ScenarioConfig,
    pub format: Format,
    pub out: Option<std::path::PathBuf>,
}

/// What the command line asked for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Help,
    Run(Invocation),
}

/// `--config FILE`, `--format json|csv`, `--out PATH`; every other
/// `--key value` (or `--key=value`) overrides the config file.
pub fn parse_args<I, S>(args: I) -> Result<Command, CliError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let args: Vec<String> = args.into_iter().map(|s| s.as_ref().to_string()).collect();
    let mut flags = BTreeMap::new();
    let mut config_file = None;
    let mut format = None;
    let mut out = None;
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        if arg == "-h" || arg == "--help" {
            return Ok(Command::Help);
        }
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(CliError::Usage(format!("unexpected argument \"{arg}\"")));
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (normalize(k), v.to_string()),
            None => {
                i += 1;
                let v = args
                    .get(i)
                    .ok_or_else(|| CliError::Usage(format!("flag --{flag} needs a value")))?;
                (normalize(flag), v.clone())
            }
        };
        match key.as_str() {
            "config" => config_file = Some(value),
            "format" => {
                format = Some(match value.as_str() {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(CliError::Usage(format!("unknown format \"{value}\""))),
                })
            }
            "out" => out = Some(std::path::PathBuf::from(value)),
            _ => {
                if flags.insert(key.clone(), value).is_some() {
                    return Err(CliError::Usage(format!("flag --{key} given twice")));
                }
            }
        }
        i += 1;
    }
    let mut merged = match &config_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io { path: path.into(), source: e })?;
            parse_config_text(&text).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("{path}: {m}")),
                other => other,
            })?
        }
        None => BTreeMap::new(),
    };
    merged.extend(flags);
    let config = ScenarioConfig::from_map(&merged)?;
    let format = format.unwrap_or_else(|| match &out {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => Format::Csv,
        _ => Format::Json,
    });
    Ok(Command::Run(Invocation { config, format, out }))
}

fn describe(out: &mut String, k: &KeySpec) {
    let default = if k.default.is_empty() { String::new() } else { format!(" [{}]", k.default) };
    out.push_str(&format!("  {:<12}{}{}\n", k.name, k.help, default));
}

pub fn usage() -> String {
    let mut s = String::from(
        "usage: qnetsim --scenario NAME [--KEY VALUE]... [--config FILE] [--format json|csv] [--out PATH]\n\n\
         Flags override values from the config file (lines of `key = value`).\n\
         Without --out the JSON report is printed to stdout.\n\
         Exit status: 0 success, 1 a trial aborted or failed, 2 usage error.\n\ncommon keys:\n",
    );
    for k in COMMON_KEYS {
        describe(&mut s, k);
    }
    for kind in ScenarioKind::ALL {
        s.push_str(&format!("\n{kind}:\n"));
        for k in kind.keys() {
            describe(&mut s, k);
        }
    }
    s
}
