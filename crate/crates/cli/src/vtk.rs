//! Legacy VTK (ASCII 2.0) export of a discrete field
//!
//! Crouzeix–Raviart fields are discontinuous at vertices, so every triangle
//! is written with its own three points; point data carries the element-local
//! trace values and cell data the gradient magnitude. Viewers render the
//! jumps faithfully instead of averaging them away.

use std::io::{self, Write};

use signorini_cr::DiscreteField;

fn float(x: f64) -> String {
    format!("{x:.15e}")
}

pub fn export_solution(field: &DiscreteField, out: &mut dyn Write) -> io::Result<()> {
    let mesh = &field.space.mesh;
    let nt = mesh.triangles.len();
    writeln!(out, "# vtk DataFile Version 2.0")?;
    writeln!(out, "discontinuous piecewise-affine solution field")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;

    writeln!(out, "POINTS {} double", 3 * nt)?;
    for t in 0..nt {
        for p in mesh.triangle_points(t) {
            writeln!(out, "{} {} 0.0", float(p[0]), float(p[1]))?;
        }
    }

    writeln!(out, "CELLS {} {}", nt, 4 * nt)?;
    for t in 0..nt {
        writeln!(out, "3 {} {} {}", 3 * t, 3 * t + 1, 3 * t + 2)?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }

    writeln!(out, "POINT_DATA {}", 3 * nt)?;
    writeln!(out, "SCALARS solution double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for t in 0..nt {
        // Corner k sits opposite face k, where that face's basis function
        // equals −1 and the other two equal +1.
        let faces = mesh.triangle_faces[t];
        let c: Vec<f64> = faces
            .iter()
            .map(|&f| field.coefficient_on_face(f))
            .collect();
        let sum: f64 = c.iter().sum();
        for k in 0..3 {
            writeln!(out, "{}", float(sum - 2.0 * c[k]))?;
        }
    }

    writeln!(out, "CELL_DATA {nt}")?;
    writeln!(out, "SCALARS gradient_magnitude double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for t in 0..nt {
        let g = field.element_gradient(t);
        writeln!(out, "{}", float(g[0].hypot(g[1])))?;
    }
    Ok(())
}

pub fn vtk_string(field: &DiscreteField) -> String {
    let mut buf = Vec::new();
    export_solution(field, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("VTK output is ASCII")
}
