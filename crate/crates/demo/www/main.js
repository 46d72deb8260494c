import init, { search_bounds_curve, young_census, grover_progress } from "./pkg/advbound_demo.js";

const $ = (id) => document.getElementById(id);

function call(f, ...args) {
  const v = JSON.parse(f(...args));
  if (v.error) throw new Error(v.error);
  return v;
}

function plot(canvas, series, yMax) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.xs);
  const x0 = Math.min(...all), x1 = Math.max(...all);
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - (y / yMax) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  ctx.font = "11px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const y = (yMax * i) / 4;
    ctx.fillText(y.toFixed(2), 4, sy(y) + 4);
    const x = x0 + ((x1 - x0) * i) / 4;
    ctx.fillText(x.toFixed(2), sx(x) - 10, h - pad + 16);
  }
  for (const { xs, ys, color } of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(sx(xs[i]), sy(y)) : ctx.moveTo(sx(xs[i]), sy(y))));
    ctx.stroke();
  }
}

function guard(msg, f) {
  try {
    msg.className = "";
    f();
  } catch (e) {
    msg.className = "err";
    msg.textContent = e.message;
  }
}

function searchCurve() {
  guard($("s-msg"), () => {
    const r = call(search_bounds_curve, +$("s-n").value, +$("s-pts").value);
    const xs = r.points.map((p) => p.epsilon);
    const keys = [["additive", "#1f77b4"], ["hybrid", "#d62728"], ["multiplicative", "#2ca02c"]];
    const yMax = Math.max(...r.points.flatMap((p) => keys.map(([k]) => p[k]))) * 1.05;
    plot($("s-plot"), keys.map(([k, color]) => ({ xs, ys: r.points.map((p) => p[k]), color })), yMax);
    const half = r.points.find((p) => p.epsilon >= 0.5);
    $("s-msg").textContent = half
      ? `at ε ≈ ${half.epsilon.toFixed(3)}: additive ${half.additive.toFixed(4)}, hybrid ${half.hybrid.toFixed(4)}, multiplicative ${half.multiplicative.toFixed(4)}`
      : "";
  });
}

function census() {
  guard($("c-msg"), () => {
    const r = call(young_census, +$("c-n").value, +$("c-m").value);
    const t = $("c-table");
    t.innerHTML = "<tr><th>λ_N below row 1</th><th>λ_M below row 1</th><th>dim</th><th>type</th><th>γ</th></tr>";
    for (const e of r.irreps) {
      const tr = t.insertRow();
      if (e.bad) tr.className = "bad";
      const show = (p) => (p.length ? `(${p.join(",")})` : "∅");
      for (const s of [show(e.lambda_n), show(e.lambda_m), e.dim, e.bad ? "bad" : "good", e.weight.toFixed(4)]) {
        tr.insertCell().textContent = s;
      }
    }
    $("c-msg").textContent = `${r.irreps.length} irreps, total dimension ${r.total}`;
  });
}

function grover() {
  guard($("g-msg"), () => {
    const r = call(grover_progress, +$("g-n").value, +$("g-k").value);
    const yMax = Math.max(1, ...r.progress) * 1.05;
    plot($("g-plot"), [
      { xs: r.progress.map((_, t) => t), ys: r.progress, color: "#9467bd" },
      { xs: r.success.map((_, k) => k * r.calls_per_iteration), ys: r.success, color: "#ff7f0e" },
    ], yMax);
    $("g-msg").textContent =
      `largest change per query ${r.max_step.toFixed(5)} ≤ ${r.step_limit.toFixed(5)}: ${r.pass ? "holds" : "violated"}; ` +
      `final success ${r.success[r.success.length - 1].toFixed(6)}`;
  });
}

await init();
$("s-go").onclick = searchCurve;
$("c-go").onclick = census;
$("g-go").onclick = grover;
searchCurve();
census();
grover();
