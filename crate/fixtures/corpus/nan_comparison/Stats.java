package demo;

public class Stats {
    public boolean showBug(double[] xs) {
        double sum = 0.0;
        for (int i = 0; i < xs.length; i++) {
            sum += xs[i];
        }
        double mean = sum / xs.length;
        return mean == Double.NaN;
    }
}
