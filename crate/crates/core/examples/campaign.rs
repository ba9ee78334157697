//! Run the desk-theory preset and write every report format.

use kinkstat::campaign::{emit_report, preset_names, run_campaign, CampaignConfig, ReportFormat};

fn main() -> kinkstat::Result<()> {
    println!("presets: {:?}", preset_names());
    let config = CampaignConfig::preset("desk-theory")?;
    let report = run_campaign(&config)?;
    let out = std::env::temp_dir().join("kinkstat-campaign-example");
    for format in [ReportFormat::Json, ReportFormat::CsvBundle, ReportFormat::MarkdownTable] {
        for f in emit_report(&report, format, &out)? {
            println!("wrote {}", f.display());
        }
    }
    print!("{}", std::fs::read_to_string(out.join("report.md"))?);
    Ok(())
}
