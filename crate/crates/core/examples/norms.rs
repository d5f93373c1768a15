//! Contexts, antecedents and norms over the phone-ringer schema.

use siga::norm::ContextSchema;

fn main() {
    let s = ContextSchema::ringer();
    println!(
        "{} contexts, {} antecedents, {} candidate norms",
        s.context_count(),
        s.antecedent_count(),
        s.enumerate_norms().len()
    );

    let ctx = s.context(&[("calleeLoc", "M"), ("callerRel", "family"), ("urgent", "true")]).unwrap();
    let urgent = s.norm(&[("urgent", "true")], "ring").unwrap();
    let meeting = s.norm(&[("calleeLoc", "M")], "ignore").unwrap();
    let library = s.norm(&[("calleeLoc", "L")], "ignore").unwrap();
    println!("\nin {}:", s.format_context(&ctx));
    for n in [&urgent, &meeting, &library] {
        println!("  {:<28} applies: {}", s.format_norm(n), n.antecedent.matches(&ctx).unwrap());
    }

    let specific = s.parse_norm("callerRel=friend & urgent=true -> ring").unwrap();
    println!(
        "\n{} is more general than {}: {}",
        s.format_antecedent(&urgent.antecedent),
        s.format_antecedent(&specific.antecedent),
        urgent.antecedent.is_more_general(&specific.antecedent)
    );
    let covered = s.enumerate_contexts().iter().filter(|c| specific.antecedent.matches(c).unwrap()).count();
    println!("{} covers {covered} contexts", s.format_norm(&specific));

    match s.parse_norm("calleeLoc=Mars -> ring") {
        Ok(n) => println!("parsed {}", s.format_norm(&n)),
        Err(e) => println!("rejected: {e}"),
    }
}
