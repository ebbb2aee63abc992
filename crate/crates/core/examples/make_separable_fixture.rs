//! Writes the separable two-game, two-language fixture: XML talk tables, a
//! run config and the corpus built from them.
//!
//! A persuade line always names a currency (gold, credits, coins) and is a
//! single sentence; no other line mentions one.
//!
//! ```text
//! cargo run -p persuasion-corpus --example make_separable_fixture -- crates/core/tests/fixtures/separable
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use persuasion_corpus::cli::cmd_build;
use persuasion_corpus::tlk::{render_tlk_xml, TalkTable, TlkEntry};

const NUMBERS: [u32; 5] = [20, 50, 100, 250, 500];

const OFFERS: [(&str, &str); 5] = [
    ("I'll give you {n} {c} for your silence.", "Ich gebe dir {n} {c} für dein Schweigen."),
    ("Here are {n} {c}, now let me through.", "Hier sind {n} {c}, jetzt lass mich durch."),
    ("Would {n} {c} change your mind?", "Würden {n} {c} deine Meinung ändern?"),
    ("Take {n} {c} and forget you saw me.", "Nimm {n} {c} und vergiss, dass du mich gesehen hast."),
    ("I can pay {n} {c} if you help me.", "Ich kann {n} {c} zahlen, wenn du mir hilfst."),
];

const CURRENCIES: [(&str, &str); 3] = [("gold", "Gold"), ("credits", "Credits"), ("coins", "Münzen")];

const SUBJECTS: [(&str, &str); 8] = [
    ("The droid", "Der Droide"),
    ("The captain", "Der Kapitän"),
    ("My brother", "Mein Bruder"),
    ("The old hermit", "Der alte Einsiedler"),
    ("This ship", "Dieses Schiff"),
    ("The guard", "Der Wächter"),
    ("Your friend", "Dein Freund"),
    ("The merchant", "Der Händler"),
];

const PREDICATES: [(&str, &str); 8] = [
    ("is waiting in the hangar.", "wartet im Hangar."),
    ("left for the city yesterday.", "ist gestern in die Stadt gegangen."),
    ("will not open the door.", "wird die Tür nicht öffnen."),
    ("knows the way to the temple.", "kennt den Weg zum Tempel."),
    ("needs repairs before we leave.", "braucht Reparaturen, bevor wir aufbrechen."),
    ("has been here for years.", "ist schon seit Jahren hier."),
    ("wants to talk to you.", "will mit dir reden."),
    ("is not what it seems.", "ist nicht, was es scheint."),
];

const TAILS: [(&str, &str); 3] = [
    ("", ""),
    (" Come back later.", " Komm später wieder."),
    (" I will give you the map, <FullName>.", " Ich gebe dir die Karte, <FullName>."),
];

struct Game {
    id: &'static str,
    /// Rotates template choices so the two games differ.
    offset: usize,
}

fn lines(game: &Game) -> (Vec<TlkEntry>, Vec<TlkEntry>) {
    let mut en = vec![TlkEntry::default()];
    let mut de = vec![TlkEntry::default()];

    for (i, (offer_en, offer_de)) in OFFERS.iter().enumerate() {
        for (j, n) in NUMBERS.iter().enumerate() {
            let (c_en, c_de) = CURRENCIES[(i + j + game.offset) % CURRENCIES.len()];
            let tag = if (i + j + game.offset).is_multiple_of(7) { "[Persuade/Lie]" } else { "[Persuade]" };
            let fill = |t: &str, c: &str| t.replace("{n}", &n.to_string()).replace("{c}", c);
            en.push(TlkEntry::text(format!("{tag} {}", fill(offer_en, c_en))));
            de.push(TlkEntry::text(format!("[Überreden] {}", fill(offer_de, c_de))));
        }
    }

    for (s, (subj_en, subj_de)) in SUBJECTS.iter().enumerate() {
        for (p, (pred_en, pred_de)) in PREDICATES.iter().enumerate() {
            for (t, (tail_en, tail_de)) in TAILS.iter().enumerate() {
                let lie = (s * PREDICATES.len() + p + t + game.offset).is_multiple_of(11);
                let (tag_en, tag_de) = if lie { ("[Lie] ", "[Lügen] ") } else { ("", "") };
                en.push(TlkEntry::text(format!("{tag_en}{subj_en} {pred_en}{tail_en}")));
                de.push(TlkEntry::text(format!("{tag_de}{subj_de} {pred_de}{tail_de}")));
            }
        }
    }

    // developer notes survive in the English file and are dropped from German
    for k in 0..3 {
        en.push(TlkEntry::text(format!("Do not translate: cut quest note {k}.")));
        de.push(TlkEntry::text(format!("DO NOT TRANSLATE - cut quest note {k}")));
    }
    en.push(TlkEntry::text("[Persuade]"));
    de.push(TlkEntry::text("[Überreden]"));
    (en, de)
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap_or_else(|e| panic!("writing {}: {e}", path.display()));
}

fn main() {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/core/tests/fixtures/separable"));
    fs::create_dir_all(&dir).expect("create fixture dir");

    let games = [Game { id: "alpha", offset: 0 }, Game { id: "beta", offset: 1 }];
    let mut config = String::from(
        "# Separable fixture: persuade lines, and only they, name a currency.\noutput_dir = \"corpus\"\n\n[pipeline]\nlanguages = [\"en\", \"de\"]\n",
    );
    for game in &games {
        let (en, de) = lines(game);
        for (language, language_id, entries) in [("en", 0, en), ("de", 2, de)] {
            let table = TalkTable { language_id, entries };
            write(&dir.join(format!("{}.{language}.xml", game.id)), &render_tlk_xml(&table));
        }
        config.push_str(&format!(
            "\n[[games]]\nid = \"{0}\"\ntables = {{ en = \"{0}.en.xml\", de = \"{0}.de.xml\" }}\n",
            game.id
        ));
    }
    let config_path = dir.join("run.toml");
    write(&config_path, &config);

    let manifest = cmd_build(&config_path, None).expect("fixture builds");
    print!("{manifest}");
}
