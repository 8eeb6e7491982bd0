#![no_main]

use chenstein_cli::{schema, Experiment, Table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let experiment = Experiment::ALL[usize::from(pick) % Experiment::ALL.len()];
    let columns = schema(experiment);
    if let Ok(t) = Table::parse_jsonl(text, &columns) {
        let again = Table::parse_jsonl(&t.to_jsonl(), &columns).expect("emitted JSONL parses");
        assert_eq!(again, t);
        t.to_csv().expect("parsed tables serialize");
    }
});
