use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Surface `E(R, p)` from `exponent --family depolarizing --sweep p:.. --sweep R:..`.
    Exponent,
    /// Curves `1 - H(P_A)` and `1 - H_1(p')` from `bounds --family amplitude-damping --sweep gamma:..`.
    Bounds,
}

/// A gnuplot script reading the CSV written by the matching command.
pub fn script(figure: Figure, data: &str) -> String {
    let data = data.replace('\'', "''");
    match figure {
        Figure::Exponent => format!(
            "set datafile separator ','\n\
             set xlabel 'p'\n\
             set ylabel 'R'\n\
             set zlabel 'E(R,p)'\n\
             set ticslevel 0\n\
             splot '{data}' every ::1 using 1:2:3 with points pointtype 7 pointsize 0.3 notitle\n"
        ),
        Figure::Bounds => format!(
            "set datafile separator ','\n\
             set xlabel 'gamma'\n\
             set ylabel 'rate'\n\
             set yrange [0:1]\n\
             plot '{data}' every ::1 using 1:2 with lines title '1-H(P_A)', \\\n\
             \x20    '{data}' every ::1 using 1:3 with lines dashtype 2 title '1-H_1(p'')'\n"
        ),
    }
}
