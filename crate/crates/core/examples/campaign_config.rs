//! Build a campaign config, round-trip it through INI text and run it
//! through the command-line entry point.

use wrz::cli::{run, CampaignConfig, OutputFormat, Span};

fn main() {
    let cfg = CampaignConfig {
        weight: "circular:alpha=0,beta=4".into(),
        degrees: vec![50, 100],
        intervals: vec![Span::ALL, Span { lo: 0.0, hi: 1.0 }],
        output_format: OutputFormat::Csv,
        ..Default::default()
    };
    let text = cfg.to_ini();
    assert_eq!(CampaignConfig::from_ini(&text).unwrap(), cfg);

    let dir = std::env::temp_dir().join("wrz-campaign-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("campaign.ini");
    std::fs::write(&path, &text).unwrap();
    let code = run(
        ["wrz", "expected", "--config", path.to_str().unwrap()],
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    println!("exit code {code}");
}
