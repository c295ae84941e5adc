import { runFigure } from "../render.js";

runFigure("fig4");
