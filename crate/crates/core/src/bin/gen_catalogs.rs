fn main() {
    let catalog = lp3sim::search::cut_catalog(7);
    for entry in &catalog {
        let inst = lp3sim::model::Instance::Combinatorial(entry.graph.clone());
        let text = lp3sim::model::serialize_instance(&inst);
        let path = format!("crates/core/data/catalogs/{}.lp3g", entry.graph.name);
        std::fs::write(&path, text).unwrap();
        println!("{} n={} vertices={}", entry.graph.name, entry.graph.num_facets(), entry.graph.num_vertices);
    }
}
