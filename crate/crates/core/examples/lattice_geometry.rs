//! Oriented boundaries, outstretched boxes and the Knight graph.

use eastlab::lattice::{
    enlargement, is_outstretched, knight_embed, knight_neighbors, knight_project, oriented_boundary, BoxShape, Point,
    Region,
};

fn main() -> eastlab::Result<()> {
    let v = Region::new(2, [Point::from([1, 1]), Point::from([2, 1]), Point::from([2, 2])])?;
    let boundary: Vec<String> = oriented_boundary(&v).iter().map(|p| p.to_string()).collect();
    println!("oriented boundary of {:?}: {}", v.sites(), boundary.join(" "));
    println!("box at origin has empty boundary: {}", oriented_boundary(&BoxShape::cube(2, 3).region()).is_empty());

    let q = 1.0 / 8.0;
    for lengths in [[4, 4], [0, 8], [0, 9], [2, 30]] {
        println!("{lengths:?} outstretched (beta 1, kappa 1): {}", is_outstretched(&lengths, 1.0, 1.0, q)?);
    }

    let x = Point::from([2, 1]);
    let z = knight_embed(&x)?;
    println!("\nx = {x} embeds as {} in W", z.coords);
    println!("back: {:?}", knight_project(&z.coords));
    let nb: Vec<String> = knight_neighbors(&z.coords).iter().map(|p| p.to_string()).collect();
    println!("Knight neighbours: {}", nb.join(" "));
    let e: Vec<String> = enlargement(&z.coords).iter().map(|p| p.to_string()).collect();
    println!("enlargement E_z ({} points): {}", e.len(), e.join(" "));
    Ok(())
}
