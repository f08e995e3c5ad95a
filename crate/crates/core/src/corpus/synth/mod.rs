//! Seeded synthetic corpus generator. Every contract is produced twice from
//! the same block model: as markup, and as the plain text the normaliser is
//! expected to recover, together with a ground-truth manifest.

mod templates;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use self::templates::*;
use super::store::{write_atomic, write_json};
use super::{ContractDoc, FilingMeta, RawInput};
use crate::error::Result;
use crate::extraction::{normalize_name, CalendarDate, PartyRole};
use crate::labels::ClauseLabel;
use crate::multihop::{calendar_add, number_words, Duration, DurationUnit, LifecycleBasis};
use crate::text::similarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingStyle {
    /// "ARTICLE IV" over "INDEMNIFICATION".
    Article,
    /// "4. Indemnification".
    Numbered,
    /// "INDEMNIFICATION".
    Caps,
    /// "Indemnification".
    Title,
}

/// Relative weights of the heading styles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleMix {
    pub article: f64,
    pub numbered: f64,
    pub caps: f64,
    pub title: f64,
}

impl Default for StyleMix {
    fn default() -> Self {
        Self { article: 0.25, numbered: 0.35, caps: 0.2, title: 0.2 }
    }
}

impl StyleMix {
    pub fn only(style: HeadingStyle) -> Self {
        let mut mix = Self { article: 0.0, numbered: 0.0, caps: 0.0, title: 0.0 };
        match style {
            HeadingStyle::Article => mix.article = 1.0,
            HeadingStyle::Numbered => mix.numbered = 1.0,
            HeadingStyle::Caps => mix.caps = 1.0,
            HeadingStyle::Title => mix.title = 1.0,
        }
        mix
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> HeadingStyle {
        let weights = [self.article, self.numbered, self.caps, self.title].map(|w| w.max(0.0));
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return HeadingStyle::Numbered;
        }
        let mut x = rng.gen::<f64>() * total;
        let styles = [HeadingStyle::Article, HeadingStyle::Numbered, HeadingStyle::Caps, HeadingStyle::Title];
        for (w, s) in weights.iter().zip(styles) {
            if x < *w {
                return s;
            }
            x -= w;
        }
        HeadingStyle::Title
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyTruth {
    pub name: String,
    pub role: PartyRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionTruth {
    pub heading_text: String,
    pub label: ClauseLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractTruth {
    pub contract_id: String,
    pub is_master: bool,
    pub style: HeadingStyle,
    pub effective_date: CalendarDate,
    pub master_date: CalendarDate,
    pub dated_date: CalendarDate,
    pub duration_term: Option<Duration>,
    pub termination: Option<CalendarDate>,
    pub termination_basis: LifecycleBasis,
    pub parties: Vec<PartyTruth>,
    pub sections: Vec<SectionTruth>,
}

impl ContractTruth {
    /// `DD/MM/YYYY` or `evergreen`.
    pub fn termination_text(&self) -> String {
        self.termination.map_or_else(|| "evergreen".into(), |d| d.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyTruth {
    pub master_id: String,
    pub amendment_ids: Vec<String>,
    pub parties: Vec<PartyTruth>,
    pub contracts: Vec<ContractTruth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub families: Vec<FamilyTruth>,
}

impl CorpusManifest {
    pub fn contracts(&self) -> impl Iterator<Item = &ContractTruth> {
        self.families.iter().flat_map(|f| f.contracts.iter())
    }

    pub fn contract(&self, id: &str) -> Option<&ContractTruth> {
        self.contracts().find(|c| c.contract_id == id)
    }

    /// Master id of the family containing `id`.
    pub fn master_of(&self, id: &str) -> Option<&str> {
        self.families
            .iter()
            .find(|f| f.contracts.iter().any(|c| c.contract_id == id))
            .map(|f| f.master_id.as_str())
    }

    pub fn load(path: &Path) -> Result<Self> {
        super::store::read_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    /// Documents with unlabelled sections, ordered by contract id.
    pub docs: Vec<ContractDoc>,
    pub manifest: CorpusManifest,
    /// Plain text the normaliser should recover from each document's markup.
    pub expected_text: BTreeMap<String, String>,
}

impl GeneratedCorpus {
    pub fn raw_inputs(&self) -> Vec<RawInput> {
        self.docs
            .iter()
            .map(|d| RawInput { contract_id: d.contract_id.clone(), markup: d.raw_markup.clone(), meta: d.meta() })
            .collect()
    }

    /// Writes `<id>.htm`, `<id>.json` (filing metadata) and `manifest.json`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for d in &self.docs {
            write_atomic(&dir.join(format!("{}.htm", d.contract_id)), d.raw_markup.as_bytes())?;
            write_json(&dir.join(format!("{}.json", d.contract_id)), &d.meta())?;
        }
        self.manifest.save(&dir.join("manifest.json"))
    }
}

/// Generates `n_families` contract families (a master plus 0..=5
/// amendments each).
pub fn generate_corpus(seed: u64, n_families: usize, style_mix: &StyleMix) -> GeneratedCorpus {
    Generator::new(seed, style_mix.clone()).run(Target::Families(n_families.max(1)))
}

/// Generates families until exactly `n_contracts` contracts exist; the last
/// family may receive fewer amendments than drawn.
pub fn generate_corpus_sized(seed: u64, n_contracts: usize, style_mix: &StyleMix) -> GeneratedCorpus {
    Generator::new(seed, style_mix.clone()).run(Target::Contracts(n_contracts.max(1)))
}

enum Target {
    Families(usize),
    Contracts(usize),
}

struct Block {
    heading: bool,
    lines: Vec<String>,
}

struct Family {
    trust: Option<String>,
    funds: Vec<String>,
    custodian: String,
}

impl Family {
    fn parties(&self) -> Vec<PartyTruth> {
        let mut out = Vec::new();
        if let Some(t) = &self.trust {
            out.push(PartyTruth { name: t.clone(), role: PartyRole::Trust });
        }
        out.extend(self.funds.iter().map(|f| PartyTruth { name: f.clone(), role: PartyRole::Fund }));
        out.push(PartyTruth { name: self.custodian.clone(), role: PartyRole::Custodian });
        out
    }
}

/// Per-contract variable terms, so that amendments really change clauses.
struct Terms {
    fee: String,
    bps: String,
    txn: String,
    ftxn: String,
    maint: String,
    capital: String,
    state: String,
    persons: Vec<String>,
}

struct Generator {
    seed: u64,
    rng: ChaCha8Rng,
    mix: StyleMix,
    used_names: Vec<String>,
    used_brands: BTreeSet<String>,
}

fn roman(mut n: usize) -> String {
    const TABLE: [(usize, &str); 9] =
        [(100, "C"), (90, "XC"), (50, "L"), (40, "XL"), (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")];
    let mut out = String::new();
    for (v, s) in TABLE {
        while n >= v {
            out.push_str(s);
            n -= v;
        }
    }
    out
}

fn ordinal_suffix(day: u32) -> &'static str {
    match (day % 10, day % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    }
}

const MONTH_NAMES: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November", "December",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn title_to_caps(s: &str) -> String {
    s.to_uppercase()
}

fn join_names(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [rest @ .., last] => format!("{}, and {last}", rest.join(", ")),
    }
}

impl Generator {
    fn new(seed: u64, mix: StyleMix) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed), mix, used_names: Vec::new(), used_brands: BTreeSet::new() }
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).unwrap()
    }

    fn distinct_enough(&self, name: &str) -> bool {
        let norm = normalize_name(name);
        self.used_names.iter().all(|u| similarity(u, &norm) < 0.85)
    }

    fn remember(&mut self, name: &str) {
        self.used_names.push(normalize_name(name));
    }

    fn brand(&mut self) -> String {
        loop {
            let root = *self.pick(BRAND_ROOTS);
            let suffix = *self.pick(BRAND_SUFFIXES);
            let brand = format!("{root}{suffix}");
            if brand.len() >= 5 && !self.used_brands.contains(&brand) && self.used_brands.iter().all(|b| similarity(&b.to_lowercase(), &brand.to_lowercase()) < 0.8) {
                self.used_brands.insert(brand.clone());
                return brand;
            }
            if self.used_brands.len() > 250 {
                let brand = format!("{root}{suffix} {}", self.used_brands.len());
                self.used_brands.insert(brand.clone());
                return brand;
            }
        }
    }

    fn family(&mut self, index: usize) -> Family {
        if index == 0 {
            let f = Family {
                trust: Some("BNY Mellon Funds Trust".into()),
                funds: vec!["BNY Mellon International Equity Income Fund".into(), "BNY Mellon Municipal Opportunities Fund".into()],
                custodian: "The Bank of New York Mellon".into(),
            };
            for n in f.funds.iter().chain(f.trust.iter()) {
                self.remember(n);
            }
            return f;
        }
        let brand = self.brand();
        let with_trust = self.rng.gen_bool(0.7);
        let n_funds = if with_trust { self.rng.gen_range(1..=3) } else { self.rng.gen_range(1..=2) };
        let mut funds = Vec::new();
        let mut strategies: Vec<&str> = STRATEGIES.to_vec();
        strategies.shuffle(&mut self.rng);
        for strategy in strategies {
            if funds.len() == n_funds {
                break;
            }
            let name = format!("{brand} {strategy} Fund");
            if self.distinct_enough(&name) && funds.iter().all(|f: &String| similarity(&normalize_name(f), &normalize_name(&name)) < 0.85) {
                self.remember(&name);
                funds.push(name);
            }
        }
        let trust = with_trust.then(|| {
            let name = format!("{brand} {}", self.pick(TRUST_SUFFIXES));
            self.remember(&name);
            name
        });
        let custodian = self.pick(CUSTODIANS).to_string();
        Family { trust, funds, custodian }
    }

    fn date_between(&mut self, lo: CalendarDate, hi: CalendarDate) -> CalendarDate {
        let d = self.rng.gen_range(lo.to_days()..=hi.to_days());
        CalendarDate::from_days(d).unwrap()
    }

    fn render_date(&mut self, d: CalendarDate) -> String {
        let month = MONTH_NAMES[d.month() as usize - 1];
        match self.rng.gen_range(0..10) {
            0..=3 => format!("{month} {}, {}", d.day(), d.year()),
            4..=6 => format!("the {}{} day of {month}, {}", d.day(), ordinal_suffix(d.day()), d.year()),
            7..=8 => format!("{} {month} {}", d.day(), d.year()),
            _ if d.day() > 12 => format!("{:02}/{:02}/{}", d.month(), d.day(), d.year()),
            _ => format!("{month} {}, {}", d.day(), d.year()),
        }
    }

    fn render_duration(&mut self, dur: Duration) -> String {
        let unit = match (dur.unit, dur.count) {
            (DurationUnit::Years, 1) => "year",
            (DurationUnit::Years, _) => "years",
            (DurationUnit::Months, 1) => "month",
            (DurationUnit::Months, _) => "months",
            (DurationUnit::Days, 1) => "day",
            (DurationUnit::Days, _) => "days",
        };
        match self.rng.gen_range(0..3) {
            0 => format!("{} {unit}", dur.count),
            1 => format!("{} {unit}", number_words(dur.count)),
            _ => format!("{} ({}) {unit}", number_words(dur.count), dur.count),
        }
    }

    fn draw_duration(&mut self) -> Duration {
        match self.rng.gen_range(0..10) {
            0..=5 => Duration::new(self.rng.gen_range(1..=10), DurationUnit::Years),
            6..=8 => Duration::new(*self.pick(&[6, 12, 18, 24, 30, 36, 42, 48, 60]), DurationUnit::Months),
            _ => Duration::new(*self.pick(&[90, 180, 270, 365, 730]), DurationUnit::Days),
        }
    }

    fn notice(&mut self) -> String {
        let days = *self.pick(&[30u32, 60, 90, 120, 180]);
        format!("{} ({days}) days'", number_words(days))
    }

    fn terms(&mut self) -> Terms {
        let n_persons = self.rng.gen_range(2..=4);
        let persons = (0..n_persons)
            .map(|_| {
                let first = *self.pick(FIRST_NAMES);
                let last = *self.pick(LAST_NAMES);
                let title = *self.pick(OFFICER_TITLES);
                format!("{first} {last}, {title}")
            })
            .collect();
        Terms {
            fee: format!("${},000", self.rng.gen_range(10..=250)),
            bps: format!("0.{:04}%", self.rng.gen_range(50..=400)),
            txn: format!("${}.00", self.rng.gen_range(5..=40)),
            ftxn: format!("${}.00", self.rng.gen_range(20..=150)),
            maint: format!("${},{:03}", self.rng.gen_range(1..=9), self.rng.gen_range(0..=9) * 100),
            capital: format!("${},000,000", self.rng.gen_range(2..=50) * 5),
            state: self.pick(LAW_STATES).to_string(),
            persons,
        }
    }

    fn fill(&self, template: &str, terms: &Terms, term_sentence: &str) -> String {
        template
            .replace("{fee}", &terms.fee)
            .replace("{bps}", &terms.bps)
            .replace("{txn}", &terms.txn)
            .replace("{ftxn}", &terms.ftxn)
            .replace("{maint}", &terms.maint)
            .replace("{capital}", &terms.capital)
            .replace("{state}", &terms.state)
            .replace("{persons}", &terms.persons.join("\n"))
            .replace("{term}", term_sentence)
    }

    fn heading_variant(&mut self, t: &templates::ClauseTemplate) -> String {
        let r: f64 = self.rng.gen();
        if r < 0.70 {
            t.heading.to_string()
        } else if r < 0.88 {
            self.pick(t.aliases).to_string()
        } else {
            self.pick(t.paraphrases).to_string()
        }
    }

    fn heading_block(style: HeadingStyle, number: usize, title: &str) -> Vec<String> {
        match style {
            HeadingStyle::Article => vec![format!("ARTICLE {}", roman(number)), title_to_caps(title)],
            HeadingStyle::Numbered => vec![format!("{number}. {title}")],
            HeadingStyle::Caps => vec![title_to_caps(title)],
            HeadingStyle::Title => vec![title.to_string()],
        }
    }

    fn client_clause(&mut self, fam: &Family) -> String {
        match &fam.trust {
            Some(trust) => format!(
                "{trust}, a Massachusetts business trust, on behalf of each of its series listed on Appendix A, including {} (each, a \"Fund\")",
                join_names(&fam.funds)
            ),
            None if fam.funds.len() == 1 => {
                format!("{}, a Maryland corporation (the \"Fund\")", fam.funds[0])
            }
            None => format!("each of {}, each a Maryland corporation (each, a \"Fund\")", join_names(&fam.funds)),
        }
    }

    fn custodian_clause(&mut self, fam: &Family) -> String {
        let kind = if fam.custodian.contains("Trust Company") {
            "a trust company"
        } else if fam.custodian.contains("N.A.") || fam.custodian.contains("National Association") {
            "a national banking association"
        } else {
            "a banking corporation"
        };
        format!("{}, {kind} (the \"Custodian\")", fam.custodian)
    }

    fn signature_blocks(&mut self, fam: &Family) -> Vec<Block> {
        let mut signers: Vec<String> = Vec::new();
        match &fam.trust {
            Some(t) => signers.push(format!("{}, on behalf of each of its series", t.to_uppercase())),
            None => signers.extend(fam.funds.iter().map(|f| f.to_uppercase())),
        }
        signers.push(fam.custodian.to_uppercase());
        let mut blocks = vec![Block {
            heading: false,
            lines: vec!["IN WITNESS WHEREOF, the parties hereto have caused this instrument to be executed by their duly authorized officers as of the date first written above.".into()],
        }];
        for s in signers {
            let first = *self.pick(FIRST_NAMES);
            let last = *self.pick(LAST_NAMES);
            let title = *self.pick(OFFICER_TITLES);
            blocks.push(Block {
                heading: false,
                lines: vec![s, format!("By: /s/ {first} {last}"), format!("Name: {first} {last}"), format!("Title: {title}")],
            });
        }
        blocks
    }

    fn paragraphs(text: &str) -> Vec<Block> {
        text.split("\n\n")
            .map(|p| Block {
                heading: false,
                lines: p.split('\n').map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect(),
            })
            .collect()
    }

    /// Returns (termination sentence, basis, duration, termination date).
    fn master_term(&mut self, effective: CalendarDate) -> (String, LifecycleBasis, Option<Duration>, Option<CalendarDate>) {
        let notice = self.notice();
        match self.rng.gen_range(0..20) {
            0..=11 => {
                let dur = self.draw_duration();
                let text = self.render_duration(dur);
                let sentence = match self.rng.gen_range(0..2) {
                    0 => format!("This Agreement shall continue in full force and effect for an initial term of {text} from the Effective Date. Thereafter, either party may terminate this Agreement upon {notice} prior written notice to the other party."),
                    _ => format!("The term of this Agreement shall be a period of {text} commencing on the Effective Date, provided that either party may terminate this Agreement upon {notice} prior written notice."),
                };
                (sentence, LifecycleBasis::EffectivePlusDuration, Some(dur), calendar_add(effective, dur))
            }
            12..=14 => {
                let end = effective.add_days(self.rng.gen_range(365..=3650)).unwrap();
                let lit = self.render_date(end);
                let sentence = match self.rng.gen_range(0..2) {
                    0 => format!("This Agreement shall remain in effect until {lit}, unless sooner terminated by either party upon {notice} written notice to the other party."),
                    _ => format!("Unless earlier terminated by either party upon {notice} prior written notice, this Agreement shall terminate on {lit}."),
                };
                (sentence, LifecycleBasis::ExplicitTerminationDate, None, Some(end))
            }
            _ => {
                let sentence = match self.rng.gen_range(0..2) {
                    0 => format!("This Agreement shall remain in effect until terminated by either party upon {notice} prior written notice to the other party."),
                    _ => format!("This Agreement shall continue in effect until it is terminated by either party by giving the other party {notice} written notice of termination."),
                };
                (sentence, LifecycleBasis::Evergreen, None, None)
            }
        }
    }

    fn amendment_term(&mut self, effective: CalendarDate) -> (String, LifecycleBasis, Option<Duration>, Option<CalendarDate>) {
        if self.rng.gen_bool(0.7) {
            let dur = self.draw_duration();
            let text = self.render_duration(dur);
            let sentence = format!("The term of the Agreement is hereby extended for an additional period of {text} from the effective date of this Amendment, subject to earlier termination upon {} prior written notice.", self.notice());
            (sentence, LifecycleBasis::EffectivePlusDuration, Some(dur), calendar_add(effective, dur))
        } else {
            let end = effective.add_days(self.rng.gen_range(365..=2500)).unwrap();
            let lit = self.render_date(end);
            (format!("The Agreement shall remain in effect until {lit}, unless sooner terminated as provided herein."), LifecycleBasis::ExplicitTerminationDate, None, Some(end))
        }
    }

    fn clause_blocks(&mut self, t: &templates::ClauseTemplate, terms: &Terms, term_sentence: &str) -> Vec<Block> {
        let body = *self.pick(t.bodies);
        Self::paragraphs(&self.fill(body, terms, term_sentence))
    }

    fn master(&mut self, fam: &Family, effective: CalendarDate, dated: CalendarDate) -> (Vec<Block>, ContractTruth) {
        let style = self.mix.sample(&mut self.rng);
        let terms = self.terms();
        let (term_sentence, basis, duration, termination) = self.master_term(effective);
        let mut blocks = Vec::new();
        let mut sections = Vec::new();
        let title = *self.pick(&["CUSTODY AGREEMENT", "MASTER CUSTODIAN AGREEMENT", "CUSTODIAN SERVICES AGREEMENT"]);
        let with_title = self.rng.gen_bool(0.85);
        if with_title {
            blocks.push(Block { heading: true, lines: vec![title.into()] });
        }
        sections.push(SectionTruth { heading_text: if with_title { title.into() } else { String::new() }, label: ClauseLabel::Recitals });
        let dated_s = self.render_date(dated);
        let eff_s = self.render_date(effective);
        let client = self.client_clause(fam);
        let cust = self.custodian_clause(fam);
        let kind = title.to_lowercase();
        let preamble = match self.rng.gen_range(0..2) {
            0 => format!("This {title} (the \"Agreement\") is made this {dated_s}, and shall become effective as of {eff_s} (the \"Effective Date\"), by and between {client}, and {cust}."),
            _ => format!("This {} is dated as of {dated_s} and is effective as of {eff_s} (the \"Effective Date\"), by and between {client}, and {cust}.", capitalize_words(&kind)),
        };
        blocks.push(Block { heading: false, lines: vec![preamble] });
        let recitals = *self.pick(RECITALS);
        blocks.extend(Self::paragraphs(recitals));
        let order: Vec<usize> = (0..CLAUSES.len()).collect();
        for (pos, &ci) in order.iter().enumerate() {
            let t = &CLAUSES[ci];
            if t.label == ClauseLabel::FeeSchedule {
                continue;
            }
            let heading = self.heading_variant(t);
            let lines = Self::heading_block(style, pos + 1, &heading);
            sections.push(SectionTruth { heading_text: lines.join(" "), label: t.label });
            blocks.push(Block { heading: true, lines });
            blocks.extend(self.clause_blocks(t, &terms, &term_sentence));
            if t.label == ClauseLabel::Miscellaneous {
                blocks.extend(self.signature_blocks(fam));
            }
        }
        let fs = CLAUSES.iter().find(|t| t.label == ClauseLabel::FeeSchedule).unwrap();
        let heading = self.heading_variant(fs);
        let lines = match style {
            HeadingStyle::Article | HeadingStyle::Caps => vec![title_to_caps(&heading)],
            HeadingStyle::Numbered => vec![format!("{}. {heading}", CLAUSES.len())],
            HeadingStyle::Title => vec![heading.clone()],
        };
        sections.push(SectionTruth { heading_text: lines.join(" "), label: ClauseLabel::FeeSchedule });
        blocks.push(Block { heading: true, lines });
        blocks.extend(self.clause_blocks(fs, &terms, &term_sentence));
        let truth = ContractTruth {
            contract_id: String::new(),
            is_master: true,
            style,
            effective_date: effective,
            master_date: effective,
            dated_date: dated,
            duration_term: duration,
            termination,
            termination_basis: basis,
            parties: fam.parties(),
            sections,
        };
        (blocks, truth)
    }

    fn amendment(
        &mut self,
        fam: &Family,
        k: usize,
        master_effective: CalendarDate,
        effective: CalendarDate,
        dated: CalendarDate,
        family_zero: bool,
    ) -> (Vec<Block>, ContractTruth) {
        let style = self.mix.sample(&mut self.rng);
        let terms = self.terms();
        let mut blocks = Vec::new();
        let mut sections = Vec::new();
        let title = format!("AMENDMENT NO. {k} TO CUSTODY AGREEMENT");
        blocks.push(Block { heading: true, lines: vec![title.clone()] });
        sections.push(SectionTruth { heading_text: title, label: ClauseLabel::Recitals });
        let dated_s = self.render_date(dated);
        let master_s = self.render_date(master_effective);
        let eff_s = self.render_date(effective);
        let client = self.client_clause(fam);
        let cust = self.custodian_clause(fam);
        let preamble = match self.rng.gen_range(0..2) {
            0 => format!("This AMENDMENT NO. {k} (the \"Amendment\") is made this {dated_s} to the Custody Agreement dated {master_s} (the \"Agreement\"), by and between {client}, and {cust}, and shall become effective as of {eff_s}."),
            _ => format!("This Amendment No. {k}, dated as of {dated_s}, amends the Custody Agreement dated as of {master_s} (the \"Agreement\") between {client}, and {cust}. This Amendment shall become effective as of {eff_s}."),
        };
        blocks.push(Block { heading: false, lines: vec![preamble] });
        blocks.extend(Self::paragraphs(self.pick(AMENDMENT_RECITALS)));

        let mut amendable: Vec<usize> = (0..CLAUSES.len())
            .filter(|&i| !matches!(CLAUSES[i].label, ClauseLabel::Miscellaneous | ClauseLabel::Termination))
            .collect();
        amendable.shuffle(&mut self.rng);
        let mut chosen: Vec<usize> = amendable.into_iter().take(self.rng.gen_range(1..=3)).collect();
        let auth = CLAUSES.iter().position(|t| t.label == ClauseLabel::AuthorizedPersons).unwrap();
        if family_zero && !chosen.contains(&auth) {
            chosen.push(auth);
        }
        let with_term = self.rng.gen_bool(0.4);
        let (term_sentence, basis, duration, termination) = if with_term {
            chosen.push(CLAUSES.iter().position(|t| t.label == ClauseLabel::Termination).unwrap());
            self.amendment_term(effective)
        } else {
            (String::new(), LifecycleBasis::Evergreen, None, None)
        };
        chosen.sort_unstable();
        for (pos, &ci) in chosen.iter().enumerate() {
            let t = &CLAUSES[ci];
            let heading = self.heading_variant(t);
            let lines = Self::heading_block(style, pos + 1, &heading);
            sections.push(SectionTruth { heading_text: lines.join(" "), label: t.label });
            blocks.push(Block { heading: true, lines });
            let lead = self.pick(AMENDMENT_LEADS).replace("{n}", &(ci + 1).to_string());
            blocks.push(Block { heading: false, lines: vec![lead] });
            blocks.extend(self.clause_blocks(t, &terms, &term_sentence));
        }
        let misc = CLAUSES.iter().find(|t| t.label == ClauseLabel::Miscellaneous).unwrap();
        let heading = self.heading_variant(misc);
        let lines = Self::heading_block(style, chosen.len() + 1, &heading);
        sections.push(SectionTruth { heading_text: lines.join(" "), label: ClauseLabel::Miscellaneous });
        blocks.push(Block { heading: true, lines });
        blocks.extend(Self::paragraphs(self.pick(AMENDMENT_MISC)));
        blocks.extend(self.signature_blocks(fam));
        let truth = ContractTruth {
            contract_id: String::new(),
            is_master: false,
            style,
            effective_date: effective,
            master_date: master_effective,
            dated_date: dated,
            duration_term: duration,
            termination,
            termination_basis: basis,
            parties: fam.parties(),
            sections,
        };
        (blocks, truth)
    }

    fn render(&mut self, blocks: &[Block], accession: &str, style: HeadingStyle) -> (String, String) {
        let expected = blocks.iter().map(|b| b.lines.join("\n")).collect::<Vec<_>>().join("\n\n");
        let mut html = format!("<html>\n<head><title>{accession}</title></head>\n<body>\n");
        for b in blocks {
            let lines: Vec<String> = b.lines.iter().map(|l| self.noisy_line(l)).collect();
            if b.heading {
                match style {
                    HeadingStyle::Article if lines.len() == 2 => html.push_str(&format!(
                        "<p align=\"center\"><b>{}</b><br>\n{}</p>\n",
                        lines[0], lines[1]
                    )),
                    HeadingStyle::Title => html.push_str(&format!("<p><u>{}</u></p>\n", lines.join("<br>"))),
                    _ => html.push_str(&format!("<p><b>{}</b></p>\n", lines.join("<br>"))),
                }
            } else if self.rng.gen_bool(0.2) {
                html.push_str(&format!("<div style=\"margin-top:12pt\"><font size=\"2\">{}</font></div>\n", lines.join("<br>\n")));
            } else {
                html.push_str(&format!("<p style=\"text-align: justify\">{}</p>\n", lines.join("<br>\n")));
            }
        }
        html.push_str("</body>\n</html>\n");
        (html, expected)
    }

    /// Escapes a line and adds markup noise that normalises away: wrapped
    /// source lines and non-breaking spaces.
    fn noisy_line(&mut self, line: &str) -> String {
        let words: Vec<String> = line.split(' ').map(escape).collect();
        let mut out = String::new();
        let mut col = 0;
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                if col > 70 {
                    out.push('\n');
                    col = 0;
                } else if self.rng.gen_bool(0.03) {
                    out.push_str("&nbsp;");
                } else {
                    out.push(' ');
                }
            }
            out.push_str(w);
            col += w.len() + 1;
        }
        out
    }

    fn run(mut self, target: Target) -> GeneratedCorpus {
        struct Pending {
            blocks: Vec<Block>,
            truth: ContractTruth,
            meta_parties: Vec<String>,
        }
        let mut families: Vec<(Vec<Pending>, Vec<PartyTruth>)> = Vec::new();
        let mut count = 0;
        let lo = CalendarDate::new(1995, 1, 1).unwrap();
        let hi = CalendarDate::new(2016, 12, 31).unwrap();
        for index in 0.. {
            let remaining = match target {
                Target::Families(n) if index >= n => break,
                Target::Contracts(n) if count >= n => break,
                Target::Families(_) => usize::MAX,
                Target::Contracts(n) => n - count,
            };
            let fam = self.family(index);
            let effective = self.date_between(lo, hi);
            let dated = effective.add_days(-self.rng.gen_range(0..=30)).unwrap();
            let mut n_amend = if index == 0 { 5 } else { self.rng.gen_range(0..=5) };
            n_amend = n_amend.min(remaining - 1);
            let mut members = Vec::new();
            let (blocks, truth) = self.master(&fam, effective, dated);
            let all_names: Vec<String> = fam.parties().into_iter().map(|p| p.name).collect();
            members.push(Pending { blocks, truth, meta_parties: all_names });
            let mut last = effective;
            for k in 1..=n_amend {
                let dated = last.add_days(self.rng.gen_range(150..=700)).unwrap();
                let eff = dated.add_days(self.rng.gen_range(1..=45)).unwrap();
                last = eff;
                let (blocks, truth) = self.amendment(&fam, k, effective, eff, dated, index == 0);
                let meta = vec![fam.funds[0].clone(), fam.custodian.clone()];
                members.push(Pending { blocks, truth, meta_parties: meta });
            }
            count += members.len();
            families.push((members, fam.parties()));
        }

        let total = count;
        let mut ids: Vec<usize> = (0..total).collect();
        ids.shuffle(&mut self.rng);
        let mut next = ids.into_iter();
        let mut docs = Vec::new();
        let mut expected_text = BTreeMap::new();
        let mut manifest = CorpusManifest { seed: self.seed, families: Vec::new() };
        for (members, parties) in families {
            let mut fam_truth = FamilyTruth { master_id: String::new(), amendment_ids: Vec::new(), parties, contracts: Vec::new() };
            for mut p in members {
                let id = format!("ct-{:04}", next.next().unwrap());
                let accession = format!("0000950{:03}-{:02}-{:06}", self.rng.gen_range(100..999), p.truth.dated_date.year() % 100, self.rng.gen_range(0..999_999));
                let (markup, expected) = self.render(&p.blocks, &accession, p.truth.style);
                p.truth.contract_id = id.clone();
                if p.truth.is_master {
                    fam_truth.master_id = id.clone();
                } else {
                    fam_truth.amendment_ids.push(id.clone());
                }
                let meta = FilingMeta {
                    accession_no: accession,
                    source_uri: format!("synthetic://{}/{id}", self.seed),
                    filed_date: p.truth.dated_date.add_days(self.rng.gen_range(1..=20)),
                    metadata_parties: p.meta_parties,
                };
                docs.push(ContractDoc::from_markup(id.clone(), markup, meta));
                expected_text.insert(id, expected);
                fam_truth.contracts.push(p.truth);
            }
            manifest.families.push(fam_truth);
        }
        docs.sort_by(|a, b| a.contract_id.cmp(&b.contract_id));
        GeneratedCorpus { docs, manifest, expected_text }
    }
}

fn capitalize_words(s: &str) -> String {
    s.split(' ')
        .map(|w| {
            let mut c = w.chars();
            c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
        })
        .collect::<Vec<_>>()
        .join(" ")
}
